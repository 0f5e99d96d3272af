"""
Services for the covertness app.
"""
