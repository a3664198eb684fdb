"""Desk-scale quantum GAN laboratory."""
