"""Runs estimator and ensemble sweeps"""
