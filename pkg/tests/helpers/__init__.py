from .samples import *
