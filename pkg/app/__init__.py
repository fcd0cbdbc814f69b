"""
서사 균형 툴킷
"""
__version__ = "0.1.0"
