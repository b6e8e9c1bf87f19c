"""Speaker-independent ASR toolkit for dysarthric speech at desk scale.

Subpackages
-----------
corpus      synthetic corpus generation, WAV/manifest ingestion, noise mixing
frontend    mel/gammatone/modulation feature extraction, deltas, splicing
nn          from-scratch neural network kernel (dense + conv layers, SGD)
arch        builders for the DNN/CNN/TFCNN/FCNN acoustic models
inversion   acoustic-to-articulatory inversion and trajectory smoothing
pipelines   bottleneck strategies and two-stage model adaptation
decode      trigram LM, token-passing Viterbi decoder, WER scoring
"""

__version__ = "0.1.0"
