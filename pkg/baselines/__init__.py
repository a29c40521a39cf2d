# Averaged diagnostics used for comparison
