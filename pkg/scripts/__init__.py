"""Optical Layered Encryption - command-line scripts"""
