"""Front tracking, kinetic measures and Lagrangian representations for Burgers."""
