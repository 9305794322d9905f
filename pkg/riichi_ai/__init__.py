"""
riichi_ai - self-play learning pipeline for 4-player Riichi Mahjong.
"""

__version__ = '0.1.0'

FORMAT_VERSION = 1
