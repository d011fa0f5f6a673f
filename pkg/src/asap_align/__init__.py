"""asap-align: align sports broadcast frames with play-by-play commentary.

The pipeline reads the scorecard region of each frame, parses the match
state shown there (cricket over.ball or a game clock), and uses that
state as the join key against commentary entries. Downstream tooling
cuts the aligned event chains into clips, splits them into train/val/
test partitions, and generates compositional query sets over the event
chains.
"""

__version__ = "0.1.0"
