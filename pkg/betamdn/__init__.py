# Beta mixture density network
