"""Rack-aware Tamo-Barg codes: trace repair, bandwidth bounds and flow-graph oracles."""
