namespace cantor {}
