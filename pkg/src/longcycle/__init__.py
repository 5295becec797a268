"""Long cycles in random subgraphs of graphs with large minimum degree."""
