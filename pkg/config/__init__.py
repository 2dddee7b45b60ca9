"""Configuration module."""