/** 3-D backbone trajectory preview. The polyline geometry is exactly the
 * point list the API returned; the view only projects it. */

import * as THREE from "three";
import { OrbitControls } from "three/examples/jsm/controls/OrbitControls.js";

import type { TrajectoryResponse } from "./api";

/** Flatten API trajectory points into line-vertex positions (pure, testable). */
export function polylinePositions(points: number[][]): Float32Array {
  const out = new Float32Array(points.length * 3);
  for (let i = 0; i < points.length; i++) {
    out[i * 3] = points[i][0];
    out[i * 3 + 1] = points[i][1];
    out[i * 3 + 2] = points[i][2];
  }
  return out;
}

export class TrajectoryView {
  private readonly scene = new THREE.Scene();
  private readonly camera: THREE.PerspectiveCamera;
  private renderer: THREE.WebGLRenderer | null = null;
  private controls: OrbitControls | null = null;
  private line: THREE.Line | null = null;

  constructor(container: HTMLElement) {
    const width = container.clientWidth || 480;
    const height = container.clientHeight || 360;
    this.camera = new THREE.PerspectiveCamera(50, width / height, 0.1, 5000);
    this.camera.position.set(80, -120, 120);
    this.camera.up.set(0, 0, 1);
    this.scene.background = new THREE.Color(0xfafafa);
    this.scene.add(new THREE.AxesHelper(30));
    try {
      this.renderer = new THREE.WebGLRenderer({ antialias: true });
      this.renderer.setSize(width, height);
      container.appendChild(this.renderer.domElement);
      this.controls = new OrbitControls(this.camera, this.renderer.domElement);
      this.controls.addEventListener("change", () => this.render());
    } catch {
      // No WebGL (e.g. headless test runs): geometry state still works.
      this.renderer = null;
    }
  }

  show(trajectory: TrajectoryResponse): void {
    if (this.line) {
      this.scene.remove(this.line);
      this.line.geometry.dispose();
    }
    const geometry = new THREE.BufferGeometry();
    geometry.setAttribute(
      "position",
      new THREE.BufferAttribute(polylinePositions(trajectory.points), 3),
    );
    const material = new THREE.LineBasicMaterial({ color: 0x1a202c, linewidth: 2 });
    this.line = new THREE.Line(geometry, material);
    this.scene.add(this.line);
    this.controls?.target.copy(boundsCenter(trajectory.points));
    this.controls?.update();
    this.render();
  }

  /** Current line vertex positions, for assertions and debugging. */
  positions(): Float32Array | null {
    if (!this.line) return null;
    const attr = this.line.geometry.getAttribute("position");
    return new Float32Array(attr.array as Float32Array);
  }

  private render(): void {
    this.renderer?.render(this.scene, this.camera);
  }
}

function boundsCenter(points: number[][]): THREE.Vector3 {
  const center = new THREE.Vector3();
  for (const p of points) center.add(new THREE.Vector3(p[0], p[1], p[2]));
  return center.divideScalar(Math.max(points.length, 1));
}
