# Service layer — prior knowledge, tabular and image engines
