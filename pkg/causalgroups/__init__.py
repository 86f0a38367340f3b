"""Causal-kernel subgroup discovery toolkit"""
