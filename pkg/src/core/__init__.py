# Core infrastructure — config, errors, command-line entry point
