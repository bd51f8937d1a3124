"""
This is a basic __init __.py file.
It lets the interpreter know this folder is a module
"""
