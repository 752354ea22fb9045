"""Self-closeness numbers of products of catalogued spaces, with certificates."""
