"""
vqdyn: variational quantum simulation of real-space chemical dynamics.

Grid Hamiltonians are encoded on qubits and propagated with McLachlan variational
dynamics on an emulated statevector, alongside subspace and exact references.
"""
