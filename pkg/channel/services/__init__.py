"""
Services for the channel app.
"""
