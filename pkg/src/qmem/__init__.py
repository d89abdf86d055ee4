"""Photonic quantum-memristor reservoir computing."""
