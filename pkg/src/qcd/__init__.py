# Quaternionic Cowen-Douglas toolkit
