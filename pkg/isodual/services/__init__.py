# Services package: one module per domain concern
