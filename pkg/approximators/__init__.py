# Approximate posterior families and PIT computation
