"""
Third-order tensor algebra.

``core`` holds layout validation, circular differences and mode-3 FFTs;
``tsvd`` holds the t-product, the t-SVD and the tensor nuclear norm.
"""
