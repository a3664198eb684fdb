"""Adversarial training runs."""
