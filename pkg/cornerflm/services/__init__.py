# Services package for enumeration, series and asymptotics logic
