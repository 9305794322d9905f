"""Test suite for the riichi_ai pipeline."""
