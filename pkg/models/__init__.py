# PAVANE Models Package
