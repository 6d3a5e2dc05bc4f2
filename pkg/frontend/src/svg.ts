/**
 * Dependency-free figure backend: a primitive scene renders to an SVG
 * string and rasterises to a PNG buffer (RGBA, zlib via node:zlib).
 * Text appears in the SVG only; the raster keeps the geometry.
 */

import * as zlib from "node:zlib";

export interface LineSeg {
  kind: "line";
  x1: number;
  y1: number;
  x2: number;
  y2: number;
  stroke: string;
  width: number;
  dash?: string;
}

export interface Polyline {
  kind: "polyline";
  points: Array<[number, number]>;
  stroke: string;
  width: number;
  dash?: string;
  role?: string;
}

export interface Rect {
  kind: "rect";
  x: number;
  y: number;
  w: number;
  h: number;
  fill: string;
  stroke?: string;
}

export interface TextItem {
  kind: "text";
  x: number;
  y: number;
  text: string;
  size: number;
  anchor?: "start" | "middle" | "end";
}

export type Primitive = LineSeg | Polyline | Rect | TextItem;

const round = (v: number) => (Math.abs(v) < 1e-9 ? 0 : Number(v.toFixed(2)));

export class Scene {
  readonly items: Primitive[] = [];

  constructor(readonly width: number, readonly height: number) {}

  add(item: Primitive): void {
    this.items.push(item);
  }

  line(x1: number, y1: number, x2: number, y2: number, stroke = "#333333", width = 1, dash?: string): void {
    this.add({ kind: "line", x1, y1, x2, y2, stroke, width, dash });
  }

  polyline(points: Array<[number, number]>, stroke: string, width = 1.5, dash?: string, role?: string): void {
    this.add({ kind: "polyline", points, stroke, width, dash, role });
  }

  rect(x: number, y: number, w: number, h: number, fill: string, stroke?: string): void {
    this.add({ kind: "rect", x, y, w, h, fill, stroke });
  }

  text(x: number, y: number, text: string, size = 11, anchor: "start" | "middle" | "end" = "middle"): void {
    this.add({ kind: "text", x, y, text, size, anchor });
  }

  toSvg(): string {
    const parts: string[] = [];
    parts.push(
      `<svg xmlns="http://www.w3.org/2000/svg" width="${this.width}" height="${this.height}" ` +
        `viewBox="0 0 ${this.width} ${this.height}">`,
    );
    parts.push(`<rect x="0" y="0" width="${this.width}" height="${this.height}" fill="#ffffff"/>`);
    for (const it of this.items) {
      if (it.kind === "line") {
        const dash = it.dash ? ` stroke-dasharray="${it.dash}"` : "";
        parts.push(
          `<line x1="${round(it.x1)}" y1="${round(it.y1)}" x2="${round(it.x2)}" y2="${round(it.y2)}" ` +
            `stroke="${it.stroke}" stroke-width="${it.width}"${dash}/>`,
        );
      } else if (it.kind === "polyline") {
        const pts = it.points.map(([x, y]) => `${round(x)},${round(y)}`).join(" ");
        const dash = it.dash ? ` stroke-dasharray="${it.dash}"` : "";
        const role = it.role ? ` data-role="${it.role}"` : "";
        parts.push(
          `<polyline points="${pts}" fill="none" stroke="${it.stroke}" stroke-width="${it.width}"${dash}${role}/>`,
        );
      } else if (it.kind === "rect") {
        const stroke = it.stroke ? ` stroke="${it.stroke}" stroke-width="1"` : "";
        parts.push(
          `<rect x="${round(it.x)}" y="${round(it.y)}" width="${round(it.w)}" height="${round(it.h)}" ` +
            `fill="${it.fill}"${stroke}/>`,
        );
      } else {
        parts.push(
          `<text x="${round(it.x)}" y="${round(it.y)}" font-family="Helvetica, Arial, sans-serif" ` +
            `font-size="${it.size}" text-anchor="${it.anchor ?? "middle"}">${escapeXml(it.text)}</text>`,
        );
      }
    }
    parts.push("</svg>");
    return parts.join("\n") + "\n";
  }

  toPng(): Buffer {
    const raster = new Raster(this.width, this.height);
    for (const it of this.items) {
      if (it.kind === "line") {
        raster.line(it.x1, it.y1, it.x2, it.y2, it.stroke);
      } else if (it.kind === "polyline") {
        for (let i = 1; i < it.points.length; i++) {
          raster.line(it.points[i - 1][0], it.points[i - 1][1], it.points[i][0], it.points[i][1], it.stroke);
        }
      } else if (it.kind === "rect") {
        raster.fillRect(it.x, it.y, it.w, it.h, it.fill);
        if (it.stroke) {
          raster.strokeRect(it.x, it.y, it.w, it.h, it.stroke);
        }
      }
      // text is SVG-only
    }
    return raster.encode();
  }
}

function escapeXml(s: string): string {
  return s.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;");
}

function parseColor(hex: string): [number, number, number] {
  const m = /^#([0-9a-fA-F]{6})$/.exec(hex);
  if (!m) {
    return [51, 51, 51];
  }
  const v = parseInt(m[1], 16);
  return [(v >> 16) & 0xff, (v >> 8) & 0xff, v & 0xff];
}

class Raster {
  private readonly data: Uint8Array;

  constructor(readonly width: number, readonly height: number) {
    this.data = new Uint8Array(width * height * 4).fill(255);
  }

  private set(x: number, y: number, rgb: [number, number, number]): void {
    const xi = Math.round(x);
    const yi = Math.round(y);
    if (xi < 0 || yi < 0 || xi >= this.width || yi >= this.height) {
      return;
    }
    const o = (yi * this.width + xi) * 4;
    this.data[o] = rgb[0];
    this.data[o + 1] = rgb[1];
    this.data[o + 2] = rgb[2];
    this.data[o + 3] = 255;
  }

  line(x1: number, y1: number, x2: number, y2: number, color: string): void {
    const rgb = parseColor(color);
    let x = Math.round(x1);
    let y = Math.round(y1);
    const xe = Math.round(x2);
    const ye = Math.round(y2);
    const dx = Math.abs(xe - x);
    const dy = -Math.abs(ye - y);
    const sx = x < xe ? 1 : -1;
    const sy = y < ye ? 1 : -1;
    let err = dx + dy;
    for (;;) {
      this.set(x, y, rgb);
      if (x === xe && y === ye) {
        break;
      }
      const e2 = 2 * err;
      if (e2 >= dy) {
        err += dy;
        x += sx;
      }
      if (e2 <= dx) {
        err += dx;
        y += sy;
      }
    }
  }

  fillRect(x: number, y: number, w: number, h: number, color: string): void {
    const rgb = parseColor(color);
    for (let yy = Math.round(y); yy < Math.round(y + h); yy++) {
      for (let xx = Math.round(x); xx < Math.round(x + w); xx++) {
        this.set(xx, yy, rgb);
      }
    }
  }

  strokeRect(x: number, y: number, w: number, h: number, color: string): void {
    this.line(x, y, x + w, y, color);
    this.line(x + w, y, x + w, y + h, color);
    this.line(x + w, y + h, x, y + h, color);
    this.line(x, y + h, x, y, color);
  }

  encode(): Buffer {
    const stride = this.width * 4;
    const raw = Buffer.alloc((stride + 1) * this.height);
    for (let y = 0; y < this.height; y++) {
      raw[y * (stride + 1)] = 0; // filter: none
      Buffer.from(this.data.buffer, y * stride, stride).copy(raw, y * (stride + 1) + 1);
    }
    const ihdr = Buffer.alloc(13);
    ihdr.writeUInt32BE(this.width, 0);
    ihdr.writeUInt32BE(this.height, 4);
    ihdr[8] = 8; // bit depth
    ihdr[9] = 6; // RGBA
    const chunks = [
      Buffer.from([0x89, 0x50, 0x4e, 0x47, 0x0d, 0x0a, 0x1a, 0x0a]),
      pngChunk("IHDR", ihdr),
      pngChunk("IDAT", zlib.deflateSync(raw)),
      pngChunk("IEND", Buffer.alloc(0)),
    ];
    return Buffer.concat(chunks);
  }
}

const CRC_TABLE = (() => {
  const table = new Uint32Array(256);
  for (let n = 0; n < 256; n++) {
    let c = n;
    for (let k = 0; k < 8; k++) {
      c = c & 1 ? 0xedb88320 ^ (c >>> 1) : c >>> 1;
    }
    table[n] = c >>> 0;
  }
  return table;
})();

function crc32(buf: Buffer): number {
  let c = 0xffffffff;
  for (const byte of buf) {
    c = CRC_TABLE[(c ^ byte) & 0xff] ^ (c >>> 8);
  }
  return (c ^ 0xffffffff) >>> 0;
}

function pngChunk(type: string, data: Buffer): Buffer {
  const len = Buffer.alloc(4);
  len.writeUInt32BE(data.length, 0);
  const body = Buffer.concat([Buffer.from(type, "ascii"), data]);
  const crc = Buffer.alloc(4);
  crc.writeUInt32BE(crc32(body), 0);
  return Buffer.concat([len, body, crc]);
}
