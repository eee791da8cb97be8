# PAVANE App Package
