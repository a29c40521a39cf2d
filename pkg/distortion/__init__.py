# Distortion map estimation and diagnostics
