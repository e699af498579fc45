"""Cross-positive maps on symmetric matrices: biform algebra, SDP certificates,
a randomized generator of proper cross-positive maps, and Stiefel moments."""

__version__ = "0.1.0"
