"""HTTP surface onto the speed controller."""
