"""Digital twin of a jet-propelled miniature submarine: 4-DOF dynamics,
actuators and sensors, closed-loop control, telemetry protocol, mission
executor, and a live teleoperation bridge."""

__version__ = "0.1.0"
