"""Exact rational interval sets and preimages"""
