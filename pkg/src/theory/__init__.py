"""Closed-form extremal indices, digraph IFS bounds and general Cantor sets"""
