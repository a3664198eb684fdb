"""Test suite for qgan-lab."""
