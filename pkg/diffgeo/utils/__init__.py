"""Shared utilities: configuration and logging helpers"""
