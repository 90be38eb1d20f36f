# Orchestrator — command handlers composing the engines
