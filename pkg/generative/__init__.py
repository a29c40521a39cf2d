# Generative models, simulation and windowing
