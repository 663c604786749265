"""Interval maps, observables and orbit simulation"""
