"""News video frame layout analysis toolkit.

Decomposes broadcast news frames into labeled rectangular element bands
(text / natural / synthetic), merges fragmented bands with hierarchical
reasoning and scores the recovered layout against ground truth.
"""

__version__ = "0.1.0"
