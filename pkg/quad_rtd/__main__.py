# Copyright: quad-rtd contributors
# License: GNU AGPL, version 3 or later; http://www.gnu.org/licenses/agpl.html

from .cli import main

main()
