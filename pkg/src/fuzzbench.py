# The PKCS#1 v1.5 Fuzzer Evaluation Bench (fuzzbench) toolset.
#
# Copyright (C) 2024, The fuzzbench authors
#
# This program is free software: you can redistribute it and/or modify
# it under the terms of the GNU General Public License as published by
# the Free Software Foundation, either version 3 of the License, or
# (at your option) any later version.
#
# This program is distributed in the hope that it will be useful,
# but WITHOUT ANY WARRANTY; without even the implied warranty of
# MERCHANTABILITY or FITNESS FOR A PARTICULAR PURPOSE.  See the
# GNU General Public License for more details.
#
# You should have received a copy of the GNU General Public License
# along with this program.  If not, see <https://www.gnu.org/licenses/>.
"""
Evaluation bench entry point.

Equivalent to ``python -m pkcs1_fuzzbench`` and to the installed ``fuzzbench``
command.
"""
import sys

from pkcs1_fuzzbench.cli import run

if __name__ == "__main__":
    sys.exit(run())
