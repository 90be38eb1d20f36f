# Meshnet — subnet mesh memory for tabular prediction and image recognition
