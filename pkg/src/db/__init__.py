# Persistence — mesh archives
