/**
 * UI actions -> operator command frames.
 *
 * Motor channels: 1 front propulsion, 2 rear propulsion, 3 left steering,
 * 4 right steering, 5 front ballast, 6 rear ballast.
 */

export type MotorState = "forward" | "reverse" | "stop";

export function motorCommand(motorId: number, state: MotorState): string {
  if (!Number.isInteger(motorId) || motorId < 1 || motorId > 6) {
    throw new RangeError(`motor id out of range 1..6: ${motorId}`);
  }
  return `M${motorId}:${state}`;
}

/** "Forward"/"Reverse"/"Stop" buttons drive both propulsion pumps together. */
export function propulsion(state: MotorState): string[] {
  return [motorCommand(1, state), motorCommand(2, state)];
}

export function headingSetpoint(deg: number): string {
  if (!Number.isFinite(deg)) {
    throw new RangeError(`bad heading ${deg}`);
  }
  return `HDG:${deg}`;
}

export function depthSetpoint(meters: number): string {
  if (!Number.isFinite(meters) || meters < 0) {
    throw new RangeError(`bad depth ${meters}`);
  }
  return `DEP:${meters}`;
}

export function missionStart(): string {
  return "MISSION:start";
}

export function missionAbort(): string {
  return "MISSION:abort";
}
