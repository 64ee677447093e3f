"""
Main module for hqlens.

Batch pipeline turning resident posts into housing-quality evaluation units,
indicator weights and community scores.
"""
