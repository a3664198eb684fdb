"""Quantum generator, discriminator and their objectives."""
