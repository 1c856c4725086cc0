"""Szego Lab test suite"""
