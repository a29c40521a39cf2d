# MCMC samplers and exact distortion oracles
