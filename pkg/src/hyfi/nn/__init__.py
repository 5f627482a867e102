"""HGNN encoder, projection heads and parameter initialisation."""
