# Files in and out — schema files, CSV records, DOT graphs
