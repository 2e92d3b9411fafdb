# bundles/__init__.py
"""
JSON bundle schema and loader for algebras, maps, cochains and extension data
"""
